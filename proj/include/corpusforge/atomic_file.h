#pragma once

#include <filesystem>
#include <fstream>

namespace corpusforge {

// Output file that only appears at its final path after Commit(). The
// staging file is removed if the object dies uncommitted.
class AtomicOutputFile {
 public:
  explicit AtomicOutputFile(std::filesystem::path path);
  ~AtomicOutputFile();
  AtomicOutputFile(const AtomicOutputFile&) = delete;
  AtomicOutputFile& operator=(const AtomicOutputFile&) = delete;

  std::ostream& stream() { return out_; }
  const std::filesystem::path& path() const { return path_; }

  // Flushes, closes and renames onto the final path. Throws IoError.
  void Commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path staging_;
  std::ofstream out_;
  bool committed_ = false;
};

// Writes `contents` to `path` atomically.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);

std::string ReadFile(const std::filesystem::path& path);

}  // namespace corpusforge
