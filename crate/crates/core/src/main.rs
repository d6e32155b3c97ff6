fn main() {
    std::process::exit(trivortex::cli::run(std::env::args_os()));
}
