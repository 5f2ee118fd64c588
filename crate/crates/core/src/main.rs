fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(cartan_frieze::cli::run(&args));
}
