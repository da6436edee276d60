#include "swintrack/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/core.hpp>

namespace swintrack {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::string cleaned = line;
  std::replace_if(cleaned.begin(), cleaned.end(), [](char c) { return c == ',' || c == '\t' || c == '\r'; }, ' ');
  std::istringstream ss(cleaned);
  std::vector<std::string> fields;
  for (std::string f; ss >> f;) fields.push_back(f);
  return fields;
}

double parse_number(const std::string& field, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != field.size() || !std::isfinite(v)) {
    throw DatasetError(where + ": '" + field + "' is not a number");
  }
  return v;
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".ppm";
}

}  // namespace

std::vector<BBox> parse_groundtruth(std::istream& in, const std::string& source) {
  std::vector<BBox> boxes;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string where = source + ":" + std::to_string(n);
    if (fields.size() != 4) {
      throw DatasetError(where + ": expected 4 values, got " + std::to_string(fields.size()));
    }
    boxes.push_back({parse_number(fields[0], where), parse_number(fields[1], where),
                     parse_number(fields[2], where), parse_number(fields[3], where)});
  }
  return boxes;
}

Image load_image(const fs::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DatasetError("cannot read image " + path.string());
  Image image(static_cast<std::size_t>(bgr.cols), static_cast<std::size_t>(bgr.rows));
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        image.at(x, y, c) = static_cast<float>(row[x][2 - c]) / 255.0f;
      }
    }
  }
  return image;
}

void save_image(const Image& image, const fs::path& path) {
  const std::vector<std::uint8_t> rgb = image_to_u8(image);
  cv::Mat bgr(static_cast<int>(image.height), static_cast<int>(image.width), CV_8UC3);
  for (std::size_t y = 0; y < image.height; ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < image.width; ++x) {
      for (std::size_t c = 0; c < 3; ++c) row[x][2 - c] = rgb[(y * image.width + x) * 3 + c];
    }
  }
  if (!cv::imwrite(path.string(), bgr)) throw DatasetError("cannot write image " + path.string());
}

Sequence load_sequence_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DatasetError("not a directory: " + dir.string());
  const fs::path gt_path = dir / "groundtruth.txt";
  std::ifstream gt_in(gt_path);
  if (!gt_in) throw DatasetError("missing " + gt_path.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
  seq.gt = parse_groundtruth(gt_in, gt_path.string());
  if (seq.gt.size() != files.size()) {
    throw DatasetError(dir.string() + ": " + std::to_string(files.size()) + " frames but " +
                       std::to_string(seq.gt.size()) + " groundtruth lines");
  }
  for (const fs::path& f : files) {
    seq.frames.push_back(load_image(f));
    if (seq.frames.back().width != seq.frames.front().width ||
        seq.frames.back().height != seq.frames.front().height) {
      throw DatasetError(f.string() + ": frame size differs from the first frame");
    }
  }
  return seq;
}

void save_sequence_dir(const Sequence& sequence, const fs::path& dir) {
  if (sequence.frames.size() != sequence.gt.size()) {
    throw DatasetError("save_sequence_dir: frame and groundtruth counts differ");
  }
  fs::create_directories(dir);
  std::ofstream gt(dir / "groundtruth.txt");
  gt << std::setprecision(17);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    std::ostringstream name;
    name << std::setw(8) << std::setfill('0') << (i + 1) << ".png";
    save_image(sequence.frames[i], dir / name.str());
    const BBox& b = sequence.gt[i];
    gt << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
  }
  if (!gt) throw DatasetError("cannot write " + (dir / "groundtruth.txt").string());
}

void write_results(const fs::path& path, const std::vector<BBox>& boxes) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write " + path.string());
  out << std::setprecision(10);
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BBox& b = boxes[i];
    out << (i + 1) << ',' << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
  }
}

std::vector<BBox> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read " + path.string());
  std::vector<BBox> boxes;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(n);
    if (fields.size() != 5) throw DatasetError(where + ": expected frame,x,y,w,h");
    const double frame = parse_number(fields[0], where);
    if (frame != static_cast<double>(boxes.size() + 1)) {
      throw DatasetError(where + ": expected frame " + std::to_string(boxes.size() + 1));
    }
    boxes.push_back({parse_number(fields[1], where), parse_number(fields[2], where),
                     parse_number(fields[3], where), parse_number(fields[4], where)});
  }
  return boxes;
}

}  // namespace swintrack
