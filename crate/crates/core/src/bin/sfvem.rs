fn main() {
    std::process::exit(sfvem::harness::cli::run(std::env::args_os()));
}
