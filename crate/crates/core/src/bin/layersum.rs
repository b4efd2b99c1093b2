fn main() {
    std::process::exit(layersum::cli::main_with(std::env::args_os()));
}
