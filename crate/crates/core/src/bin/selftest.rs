fn main() {
    std::process::exit(selftest::harness::cli::cli_dispatch(std::env::args_os()));
}
