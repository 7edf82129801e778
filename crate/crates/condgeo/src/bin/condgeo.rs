fn main() {
    std::process::exit(condgeo::cli::run_command(std::env::args_os()));
}
