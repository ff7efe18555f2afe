fn main() {
    std::process::exit(ihc::cli::run(std::env::args_os()));
}
