fn main() {
    std::process::exit(cohpres::cli::run(std::env::args_os()));
}
