// Copyright 2026 The patchtriage Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patchtriage/io.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "patchtriage/error.h"

namespace patchtriage {

namespace {

[[noreturn]] void io_error(const std::filesystem::path& path,
                           const std::string& what) {
  throw Error(ErrorCode::kIo, path.string() + ": " + what);
}

void write_all(int fd, std::string_view contents,
               const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < contents.size()) {
    const ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string reason = std::strerror(errno);
      ::close(fd);
      io_error(path, reason);
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::stringstream ss;
  ss << in.rdbuf();
  if (in.bad()) io_error(path, "read failed");
  return ss.str();
}

void write_file_atomically(const std::filesystem::path& path,
                           std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_error(tmp, std::strerror(errno));
  write_all(fd, contents, tmp);
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    io_error(tmp, std::strerror(errno));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    io_error(path, "rename failed");
  }
}

void append_to_file(const std::filesystem::path& path,
                    std::string_view contents) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) io_error(path, std::strerror(errno));
  write_all(fd, contents, path);
  if (::fsync(fd) != 0 || ::close(fd) != 0) {
    io_error(path, std::strerror(errno));
  }
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("PATCHTRIAGE_DATA_DIR");
      env != nullptr && *env != '\0') {
    return env;
  }
  return PATCHTRIAGE_DATA_DIR;
}

}  // namespace patchtriage
