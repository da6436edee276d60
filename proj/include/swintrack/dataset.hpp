#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "swintrack/bbox.hpp"
#include "swintrack/synth.hpp"

namespace swintrack {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "x,y,w,h" lines (commas, tabs or spaces; CRLF tolerated). Blank
// lines are skipped. Errors name the offending line.
std::vector<BBox> parse_groundtruth(std::istream& in, const std::string& source = "groundtruth.txt");

// Reads a directory of image files, sorted by file name, plus groundtruth.txt.
Sequence load_sequence_dir(const std::filesystem::path& dir);
// Writes frames as 00000001.png, ... and groundtruth.txt.
void save_sequence_dir(const Sequence& sequence, const std::filesystem::path& dir);

Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

// Tracker results: one "frame,x,y,w,h" line per frame, frames counted from 1.
void write_results(const std::filesystem::path& path, const std::vector<BBox>& boxes);
std::vector<BBox> read_results(const std::filesystem::path& path);

}  // namespace swintrack
