fn main() {
    std::process::exit(ccbo::harness::cli::cli_main(std::env::args().collect()));
}
