fn main() {
    std::process::exit(polyskel::cli::main_with(std::env::args_os()));
}
