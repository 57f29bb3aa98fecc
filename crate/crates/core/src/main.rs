fn main() { std::process::exit(bellnoise::cli::run(std::env::args_os())); }
