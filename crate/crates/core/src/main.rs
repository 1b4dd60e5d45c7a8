fn main() {
    std::process::exit(isodec::cli::run(std::env::args_os()));
}
