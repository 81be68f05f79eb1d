fn main() {
    let root = std::path::Path::new("crates/ffi");
    let config = cbindgen::Config::from_file(root.join("cbindgen.toml")).unwrap();
    let generated = cbindgen::Builder::new()
        .with_crate(root)
        .with_config(config)
        .generate()
        .unwrap();
    let mut buf = Vec::new();
    generated.write(&mut buf);
    std::fs::write(root.join("include/kptau.h"), buf).unwrap();
    println!("header written");
}
