fn main() {
    let code = extkit::cli::run(std::env::args_os());
    std::process::exit(code);
}
