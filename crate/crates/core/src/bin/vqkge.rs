fn main() {
    std::process::exit(vqkge::cli::run(std::env::args_os()));
}
