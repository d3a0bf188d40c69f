fn main() {
    std::process::exit(superwave::cli::run(std::env::args_os()));
}
