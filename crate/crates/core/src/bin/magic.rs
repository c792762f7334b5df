fn main() {
    std::process::exit(mixed_magic::cli::run(std::env::args_os()));
}
