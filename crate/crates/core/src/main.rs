fn main() {
    std::process::exit(rkem::cli::run(std::env::args_os()));
}
