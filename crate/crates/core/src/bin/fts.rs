fn main() {
    std::process::exit(fts_pso::cli::main());
}
