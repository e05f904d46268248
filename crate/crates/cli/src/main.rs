fn main() {
    std::process::exit(mwt_cli::run(std::env::args_os()));
}
