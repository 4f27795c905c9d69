fn main() {
    std::process::exit(xfree_core::cli::run(std::env::args_os()));
}
