fn main() {
    std::process::exit(tsp_qaoa::cli::main());
}
