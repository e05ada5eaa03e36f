fn main() {
    std::process::exit(fou::cli::run(std::env::args_os()));
}
