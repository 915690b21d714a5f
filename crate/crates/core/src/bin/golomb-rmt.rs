fn main() {
    std::process::exit(golomb_rmt::cli::run_from(std::env::args_os()));
}
