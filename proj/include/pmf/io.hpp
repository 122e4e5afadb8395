#ifndef PMF_IO_HPP
#define PMF_IO_HPP

/// Deterministic text artifacts: CSV tables and flat JSON reports. All floats
/// are written with 17 significant digits, UTF-8, LF line endings.

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace pmf {

std::string format_float(double v);

struct Csv {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;  // equal lengths

    void add(std::string header, std::vector<double> column);
    std::string to_string() const;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Ordered flat key/value report, serialized as a single JSON object.
class Report {
  public:
    void set(const std::string& key, double value);
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value);
    void set(const std::string& key, bool value);
    void set(const std::string& key, long value);

    std::string to_json() const;
    void write(const std::filesystem::path& path) const;

  private:
    using Value = std::variant<double, std::string, bool, long>;
    std::vector<std::pair<std::string, Value>> entries_;
};

}  // namespace pmf

#endif  // PMF_IO_HPP
