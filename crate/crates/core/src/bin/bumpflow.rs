fn main() {
    std::process::exit(bumpflow::cli::run(std::env::args_os()));
}
