fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let header = std::path::Path::new(&crate_dir).join("include/reebflow.h");
    std::fs::create_dir_all(header.parent().unwrap()).unwrap();
    cbindgen::generate(&crate_dir)
        .expect("cbindgen failed to generate the C header")
        .write_to_file(header);
}
