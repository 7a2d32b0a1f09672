fn main() {
    std::process::exit(despot::cli::run(std::env::args_os()));
}
