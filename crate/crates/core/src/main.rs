// Copyright 2026 The simqdc Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(simqdc::cli::main());
}
