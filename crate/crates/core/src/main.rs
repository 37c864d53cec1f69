fn main() {
    std::process::exit(moyal_gp::cli::main_entry());
}
