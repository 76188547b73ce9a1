fn main() {
    std::process::exit(vslice::harness::cli::cli(std::env::args_os()));
}
