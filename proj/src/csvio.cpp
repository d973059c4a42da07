#include "skm/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace skm {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "csv parse error at line " << line_no << ": " << what;
  throw std::invalid_argument(msg.str());
}

std::int64_t parse_int(const std::string& s, std::size_t line_no) {
  const std::string t = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    parse_fail(line_no, "bad integer '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    parse_fail(line_no, "bad unsigned integer '" + s + "'");
  return v;
}

double parse_double_at(const std::string& s, std::size_t line_no) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    parse_fail(line_no, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) { return parse_double_at(s, 0); }

PointSet parse_csv_points(std::istream& in, bool header) {
  PointSet out;
  std::string line;
  std::size_t line_no = 0;
  if (header && std::getline(in, line)) ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    Point row;
    row.reserve(fields.size());
    for (const auto& f : fields) {
      const double v = parse_double_at(f, line_no);
      if (!std::isfinite(v)) parse_fail(line_no, "non-finite value");
      row.push_back(v);
    }
    if (out.dim() != 0 && row.size() != out.dim())
      parse_fail(line_no, "row width differs from previous rows");
    out.push_row(row);
  }
  if (out.empty()) throw std::invalid_argument("csv: no data rows");
  return out;
}

void write_stream_dump(std::ostream& out, const StreamDump& dump) {
  out << "# skm-stream v1, d=" << dump.d << ", N=" << dump.batch_n
      << ", period=" << dump.period << ", epsilon=" << format_double(dump.epsilon)
      << ", seed=" << dump.seed << "\n";
  for (std::size_t b = 0; b < dump.batches.size(); ++b) {
    const PointSet& pts = dump.batches[b].points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << b << ',' << dump.concept_ids[b];
      const auto row = pts.row(i);
      for (const double v : row) out << ',' << format_double(v);
      out << "\n";
    }
  }
}

StreamDump read_stream_dump(std::istream& in) {
  StreamDump dump;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("stream dump: empty file");
  {
    unsigned long long d = 0, n = 0, seed = 0;
    int period = 0;
    char eps_buf[64] = {0};
    const int matched =
        std::sscanf(line.c_str(),
                    "# skm-stream v1, d=%llu, N=%llu, period=%d, epsilon=%63[^,], seed=%llu",
                    &d, &n, &period, eps_buf, &seed);
    if (matched != 5)
      throw std::invalid_argument("stream dump: bad header line");
    dump.d = d;
    dump.batch_n = n;
    dump.period = period;
    dump.epsilon = parse_double(eps_buf);
    dump.seed = seed;
  }

  std::size_t line_no = 1;
  std::int64_t current_batch = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != dump.d + 2)
      parse_fail(line_no, "expected batch_id,concept_id plus d coordinates");
    const std::int64_t batch_id = parse_int(fields[0], line_no);
    const std::int64_t concept_id = parse_int(fields[1], line_no);
    if (batch_id == current_batch + 1) {
      dump.batches.push_back(Batch{PointSet(dump.d), 0});
      dump.concept_ids.push_back(concept_id);
      current_batch = batch_id;
    } else if (batch_id != current_batch) {
      parse_fail(line_no, "batch ids must be consecutive");
    }
    if (concept_id != dump.concept_ids.back())
      parse_fail(line_no, "concept id changes inside a batch");
    Point row(dump.d);
    for (std::size_t j = 0; j < dump.d; ++j)
      row[j] = parse_double_at(fields[j + 2], line_no);
    dump.batches.back().points.push_row(row);
  }
  if (dump.batches.empty()) throw std::invalid_argument("stream dump: no rows");
  return dump;
}

void write_records_csv(std::ostream& out,
                       const std::vector<ExperimentRecord>& records) {
  out << "algo,eps,K,m,rho,rep,global_batch,batch_in_concept,init_surr,"
         "conv_surr,conv_skm,distances,iterations\n";
  for (const auto& r : records) {
    out << algo_id(r.algo) << ',' << format_double(r.eps) << ',' << r.k << ','
        << r.m << ',' << format_double(r.rho) << ',' << r.rep << ','
        << r.global_batch << ',' << r.batch_in_concept << ','
        << format_double(r.init_surr) << ',' << format_double(r.conv_surr) << ','
        << format_double(r.conv_skm) << ',' << r.distances << ','
        << r.iterations << "\n";
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& in) {
  std::vector<ExperimentRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line))
    throw std::invalid_argument("records csv: empty file");
  ++line_no;
  if (line.rfind("algo,eps,K,m,rho", 0) != 0)
    parse_fail(line_no, "unexpected records header");
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) parse_fail(line_no, "expected 13 fields");
    ExperimentRecord r;
    const auto algo = algo_from_id(trim(f[0]));
    if (!algo) parse_fail(line_no, "unknown algorithm id '" + f[0] + "'");
    r.algo = *algo;
    r.eps = parse_double_at(f[1], line_no);
    r.k = static_cast<std::size_t>(parse_u64(f[2], line_no));
    r.m = static_cast<int>(parse_int(f[3], line_no));
    r.rho = parse_double_at(f[4], line_no);
    r.rep = static_cast<int>(parse_int(f[5], line_no));
    r.global_batch = static_cast<int>(parse_int(f[6], line_no));
    r.batch_in_concept = static_cast<int>(parse_int(f[7], line_no));
    r.init_surr = parse_double_at(f[8], line_no);
    r.conv_surr = parse_double_at(f[9], line_no);
    r.conv_skm = parse_double_at(f[10], line_no);
    r.distances = parse_u64(f[11], line_no);
    r.iterations = static_cast<int>(parse_int(f[12], line_no));
    out.push_back(r);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "algo,eps,K,m,batch_index,metric,median,q1,q3\n";
  for (const auto& r : rows) {
    out << algo_id(r.algo) << ',' << format_double(r.eps) << ',' << r.k << ','
        << r.m << ',' << r.batch_index << ',' << r.metric << ','
        << format_double(r.median) << ',' << format_double(r.q1) << ','
        << format_double(r.q3) << "\n";
  }
}

void write_coverage_csv(std::ostream& out, const CoverageReport& report) {
  out << "T,empirical_coverage,mean_diff,center,e_halfwidth\n";
  for (const auto& row : report.rows) {
    out << row.t << ',' << format_double(row.coverage) << ','
        << format_double(row.mean_diff) << ',' << format_double(row.center)
        << ',' << format_double(row.e_halfwidth) << "\n";
  }
}

}  // namespace skm
