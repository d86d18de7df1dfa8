fn main() {
    std::process::exit(gptlab::cli::main_entry());
}
