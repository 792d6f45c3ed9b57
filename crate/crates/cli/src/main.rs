fn main() {
    varroa_scan::init_logging();
    let code = varroa_scan::run(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}
