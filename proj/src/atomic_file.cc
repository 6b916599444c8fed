#include "corpusforge/atomic_file.h"

#include <sstream>
#include <system_error>

#include "corpusforge/error.h"

namespace corpusforge {

AtomicOutputFile::AtomicOutputFile(std::filesystem::path path)
    : path_(std::move(path)) {
  staging_ = path_;
  staging_ += ".partial";
  out_.open(staging_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + path_.string() + " for writing");
}

AtomicOutputFile::~AtomicOutputFile() {
  if (committed_) return;
  out_.close();
  std::error_code ec;
  std::filesystem::remove(staging_, ec);
}

void AtomicOutputFile::Commit() {
  out_.flush();
  if (!out_) throw IoError("write to " + path_.string() + " failed");
  out_.close();
  std::error_code ec;
  std::filesystem::rename(staging_, path_, ec);
  if (ec) {
    throw IoError("cannot move output into place at " + path_.string() + ": " +
                  ec.message());
  }
  committed_ = true;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents) {
  AtomicOutputFile file(path);
  file.stream().write(contents.data(), static_cast<std::streamsize>(contents.size()));
  file.Commit();
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace corpusforge
