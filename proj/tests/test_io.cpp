#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sconcord/harness.hpp"
#include "sconcord/io/instance_io.hpp"
#include "sconcord/io/matrix_container.hpp"
#include "sconcord/io/trace_csv.hpp"

using namespace sconcord;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("sconcord_test_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

TEST(MatrixContainer, BitExactRoundTrip) {
    Rng rng(1);
    Matrix a(3, 4);
    for (int j = 0; j < 4; ++j) a.col(j) = rng.normal_vector(3);
    a(0, 0) = std::numeric_limits<double>::denorm_min();
    a(1, 1) = -0.0;
    std::vector<io::NamedMatrix> in{{"a", a}, {"empty", Matrix(0, 2)}, {"v", Matrix::Constant(5, 1, 1.0 / 3.0)}};
    std::stringstream ss;
    io::write_container(ss, in);
    const std::vector<io::NamedMatrix> out = io::read_container(ss);
    ASSERT_EQ(out.size(), 3u);
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_EQ(out[i].name, in[i].name);
        ASSERT_EQ(out[i].value.rows(), in[i].value.rows());
        ASSERT_EQ(out[i].value.cols(), in[i].value.cols());
        EXPECT_EQ(std::memcmp(out[i].value.data(), in[i].value.data(), sizeof(double) * in[i].value.size()), 0);
    }
    EXPECT_EQ(io::find_matrix(out, "v")(4, 0), 1.0 / 3.0);
    EXPECT_THROW(io::find_matrix(out, "missing"), std::runtime_error);
}

TEST(MatrixContainer, LittleEndianLayout) {
    std::stringstream ss;
    io::write_container(ss, {{"x", Matrix::Constant(1, 1, 1.0)}});
    const std::string s = ss.str();
    ASSERT_EQ(s.substr(0, 8), "SCMATRX1");
    EXPECT_EQ(static_cast<unsigned char>(s[8]), 1u);  // count, low byte first
    // the last 8 bytes are 1.0 = 0x3ff0000000000000 little-endian
    EXPECT_EQ(static_cast<unsigned char>(s[s.size() - 1]), 0x3fu);
    EXPECT_EQ(static_cast<unsigned char>(s[s.size() - 2]), 0xf0u);
}

TEST(MatrixContainer, RejectsGarbage) {
    std::stringstream bad("NOTAMATRIXFILE");
    EXPECT_THROW(io::read_container(bad), std::runtime_error);
    std::stringstream ss;
    io::write_container(ss, {{"x", Matrix::Ones(2, 2)}});
    std::stringstream cut(ss.str().substr(0, ss.str().size() - 3));
    EXPECT_THROW(io::read_container(cut), std::runtime_error);
}

TEST(InstanceIo, SaveIsDeterministicAndReloads) {
    const problems::GeneratorConfig g;
    for (problems::ProblemKind k : problems::all_problems) {
        const problems::ProblemBundle b = problems::make_bundle(k, 7, g);
        const fs::path p1 = scratch(std::string(problems::to_string(k)) + "_1.scm");
        const fs::path p2 = scratch(std::string(problems::to_string(k)) + "_2.scm");
        io::save_instance(b, g, p1.string());
        io::save_instance(problems::make_bundle(k, 7, g), g, p2.string());
        EXPECT_EQ(slurp(p1), slurp(p2)) << problems::to_string(k);
        EXPECT_EQ(slurp(io::sidecar_path(p1.string())), slurp(io::sidecar_path(p2.string())));

        const problems::ProblemBundle r = io::load_instance(p1.string());
        EXPECT_EQ(r.kind, b.kind);
        EXPECT_EQ(r.x0, b.x0);
        EXPECT_EQ(r.pair.objective.value(b.x0).value(), b.pair.objective.value(b.x0).value());
        EXPECT_EQ(r.pair.reference.value(b.x0).value(), b.pair.reference.value(b.x0).value());
        EXPECT_EQ(r.optimal_value_hint.has_value(), b.optimal_value_hint.has_value());
        if (b.optimal_value_hint) EXPECT_EQ(*r.optimal_value_hint, *b.optimal_value_hint);
    }
}

TEST(InstanceIo, SidecarRecordsHint) {
    const problems::GeneratorConfig g;
    const problems::ProblemBundle b = problems::make_bundle(problems::ProblemKind::nmf_mse, 7, g);
    const fs::path p = scratch("hint.scm");
    io::save_instance(b, g, p.string());
    const nlohmann::json j = io::read_sidecar(p.string());
    EXPECT_EQ(j.at("problem"), "nmf_mse");
    EXPECT_EQ(j.at("optimal_value_hint").get<double>(), *b.optimal_value_hint);
}

TEST(TraceCsv, FingerprintMatchesHeader) {
    std::ostringstream os;
    io::TraceRow row;
    row.iter = 3;
    row.f = 0.1;
    row.nu = std::numeric_limits<double>::infinity();
    row.accepted = false;
    io::write_trace_csv(os, {row});
    std::istringstream is(os.str());
    std::string first, header, line;
    std::getline(is, first);
    std::getline(is, header);
    std::getline(is, line);
    char expect[32];
    std::snprintf(expect, sizeof expect, "%016llx", static_cast<unsigned long long>(io::fnv1a64(header)));
    EXPECT_NE(first.find(std::string("fnv1a64=") + expect), std::string::npos);
    EXPECT_EQ(header, "iter,f,nu,sigma,ratio,accepted,lambda_min_est,step,grad_calls,hess_calls,hvp_calls,wall_nanos");
    EXPECT_EQ(line, "3,0.10000000000000001,inf,,,0,,,0,0,0,0");
}

TEST(TraceCsv, FnvKnownVector) {
    // published FNV-1a 64-bit test vectors
    EXPECT_EQ(io::fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(io::fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Harness, DeterministicRunsAreIdentical) {
    const problems::ProblemBundle b = problems::make_bundle(problems::ProblemKind::log_barrier_demo, 2);
    RunOptions opt;
    opt.method = problems::MethodKind::rnm;
    opt.deterministic = true;
    const nlohmann::json a = report_json(run_method(b, opt));
    const nlohmann::json c = report_json(run_method(problems::make_bundle(problems::ProblemKind::log_barrier_demo, 2), opt));
    EXPECT_EQ(a.dump(), c.dump());
    EXPECT_EQ(a.at("status"), "converged");
    EXPECT_EQ(a.at("wall_nanos"), 0);
}

TEST(Harness, IncompatibleMethodRejected) {
    const problems::ProblemBundle b = problems::make_bundle(problems::ProblemKind::nmf_mse, 1);
    RunOptions opt;
    opt.method = problems::MethodKind::newton_cg;
    EXPECT_THROW(run_method(b, opt), std::invalid_argument);
}
