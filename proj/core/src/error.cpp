/*
 * Copyright 2026 The Blendemo Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "blendemo/error.hpp"

namespace blendemo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kInvalidLabel: return "invalid label";
    case ErrorKind::kInvalidTarget: return "invalid target";
    case ErrorKind::kMissingClass: return "missing class";
    case ErrorKind::kEmptyDataset: return "empty dataset";
    case ErrorKind::kMaskMismatch: return "mask mismatch";
    case ErrorKind::kInvalidArchitecture: return "invalid architecture";
    case ErrorKind::kConsistency: return "consistency error";
    case ErrorKind::kConfig: return "configuration error";
    case ErrorKind::kVersion: return "version error";
    case ErrorKind::kChecksum: return "checksum error";
    case ErrorKind::kTruncated: return "truncated file";
    case ErrorKind::kIo: return "I/O error";
  }
  return "error";
}

}  // namespace blendemo
