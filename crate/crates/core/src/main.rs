// Copyright 2026 The iqst Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(iqst::cli::run(std::env::args_os()));
}
