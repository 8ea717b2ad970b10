use std::process::exit;

fn main() {
    exit(hank::cli::main_impl());
}
