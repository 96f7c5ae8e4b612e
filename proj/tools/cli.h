// Copyright 2026-present the mmlsr project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

namespace mmlsr::cli {

/// Entry point of the `mmlsr` executable. Returns the process exit code:
/// 0 on success, 1 on a module error (after printing one diagnostic line to
/// stderr), CLI11's code on a usage error.
int Run(int argc, char** argv);

}  // namespace mmlsr::cli
