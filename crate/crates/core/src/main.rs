fn main() {
    std::process::exit(lipexp::cli::run(std::env::args_os()));
}
