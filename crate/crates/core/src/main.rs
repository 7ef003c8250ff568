fn main() {
    std::process::exit(wsms_core::harness::cli::cli_main(std::env::args_os()));
}
