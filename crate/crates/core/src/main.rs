fn main() {
    let code = commcalc::cli::run(std::env::args_os());
    std::process::exit(code);
}
