//! Embeds a `git describe`-style version string as `BDFDOC_VERSION`.

use std::path::Path;
use std::process::Command;

fn git(args: &[&str]) -> Option<String> {
    let out = Command::new("git").args(args).output().ok()?;
    if !out.status.success() {
        return None;
    }
    let s = String::from_utf8(out.stdout).ok()?.trim().to_string();
    (!s.is_empty()).then_some(s)
}

fn main() {
    let pkg = std::env::var("CARGO_PKG_VERSION").unwrap_or_else(|_| "0.0.0".into());
    // A tagged checkout describes itself; otherwise fall back to the package
    // version plus the abbreviated commit.
    let version = git(&["describe", "--tags", "--dirty"])
        .or_else(|| git(&["describe", "--always", "--dirty"]).map(|d| format!("v{pkg}-g{d}")))
        .unwrap_or_else(|| format!("v{pkg}"));
    println!("cargo:rustc-env=BDFDOC_VERSION={version}");

    if let Some(dir) = git(&["rev-parse", "--git-dir"]) {
        for file in ["HEAD", "index"] {
            let path = Path::new(&dir).join(file);
            if path.exists() {
                println!("cargo:rerun-if-changed={}", path.display());
            }
        }
    }
    println!("cargo:rerun-if-changed=build.rs");
}
