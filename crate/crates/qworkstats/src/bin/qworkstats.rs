fn main() {
    std::process::exit(qworkstats::cli::main());
}
