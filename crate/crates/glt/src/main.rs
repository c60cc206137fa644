fn main() {
    std::process::exit(glt::cli::run(std::env::args_os()));
}
