fn main() {
    std::process::exit(heatgrad::cli::run(std::env::args_os()));
}
