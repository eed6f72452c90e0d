// alsel/fileio.h

// Copyright 2026  The alsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ALSEL_FILEIO_H_
#define ALSEL_FILEIO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace alsel {

/// Lower-case hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view bytes);

std::string ReadFileOrThrow(const std::filesystem::path &path);

/// Writes via a temporary file and rename, so readers never see a partial
/// file.
void WriteFileAtomic(const std::filesystem::path &path,
                     std::string_view content);

/// Write-once semantics: creates the file, or accepts an existing file with
/// byte-identical content. Any other existing content is an error
/// ("already exists"). Returns true if the file was written.
bool WriteFileOnce(const std::filesystem::path &path, std::string_view content);

/// Exclusive advisory lock on <dir>/.lock, held for the object's lifetime.
/// Throws if another writer holds it.
class WriterLock {
 public:
  explicit WriterLock(const std::filesystem::path &dir);
  ~WriterLock();
  WriterLock(const WriterLock &) = delete;
  WriterLock &operator=(const WriterLock &) = delete;

 private:
  int fd_ = -1;
};

}  // namespace alsel

#endif  // ALSEL_FILEIO_H_
