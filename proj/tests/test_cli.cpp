#include <moplot/moplot.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace moplot;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string err;
};

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("moplot-test-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult cli(const std::string& args) {
    const fs::path err = fs::temp_directory_path() / "moplot-test-cli-stderr.txt";
    const std::string command = std::string(MOPLOT_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(command.c_str());
    std::ifstream in(err);
    std::stringstream text;
    text << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

} // namespace

TEST(Cli, PlotRunWritesImagesAndFields) {
    const fs::path out = temp_dir("plot");
    const CliResult r = cli("--problem bisphere-2d --method plot --resolution 200,200 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* name : {"plot.ppm", "plot-objective.ppm", "request.json", "objectives.mopf", "mog.mopf", "heatmap.mopf",
                             "plot-ranks.mopf"}) {
        EXPECT_TRUE(fs::exists(out / name)) << name;
    }
    EXPECT_FALSE(fs::exists(out / "cost.mopf"));
    EXPECT_EQ(read_bytes(out / "plot.ppm").substr(0, 15), "P6\n200 200\n255\n");
    const Dataset d = load_dataset(out);
    EXPECT_EQ(d.grid().resolution(), (std::vector<std::size_t>{200, 200}));
    EXPECT_EQ(read_bytes(out / "plot.ppm"), encode_ppm(render_plot(*d.plot)));
}

TEST(Cli, UsageErrors) {
    const CliResult unknown = cli("--problem no-such-problem --out /tmp/x");
    EXPECT_EQ(unknown.code, 1);
    EXPECT_NE(unknown.err.find("bisphere-2d"), std::string::npos) << unknown.err;
    EXPECT_NE(unknown.err.find("dtlz2"), std::string::npos) << unknown.err;
    EXPECT_EQ(cli("--problem bisphere-2d --resolution 10,x --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d --resolution 10 --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d --resolution 5000,5000 --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d --method nope --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d --param a=oops --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d").code, 1);
    EXPECT_EQ(cli("--bogus-flag").code, 1);
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("--problem dtlz2 --method cost --out /tmp/x").code, 1);
    EXPECT_EQ(cli("--list").code, 0);
}

TEST(Cli, ImportRendersTheSameImages) {
    const fs::path out = temp_dir("import-src"), again = temp_dir("import-dst");
    ASSERT_EQ(cli("--problem peaks-2d --method heatmap,plot,cost --resolution 60,50 --out " + out.string()).code, 0);
    for (const char* file : {"heatmap.mopf", "cost.mopf", "plot-ranks.mopf"}) {
        fs::remove_all(again);
        const CliResult r = cli("--import " + (out / file).string() + " --out " + again.string());
        ASSERT_EQ(r.code, 0) << r.err;
        const std::string method = fs::path(file).stem() == "plot-ranks" ? "plot" : fs::path(file).stem().string();
        EXPECT_EQ(read_bytes(again / (method + ".ppm")), read_bytes(out / (method + ".ppm"))) << file;
        EXPECT_EQ(read_bytes(again / (method + "-objective.ppm")), read_bytes(out / (method + "-objective.ppm"))) << file;
    }
    fs::remove_all(again);
    ASSERT_EQ(cli("--import " + (out / "heatmap.mopf").string() + " --method heatmap --out " + again.string()).code, 0);
    EXPECT_EQ(read_bytes(again / "heatmap.ppm"), read_bytes(out / "heatmap.ppm"));
}

TEST(Cli, ThreeDimensionalSliceAndOnion) {
    const fs::path out = temp_dir("3d"), again = temp_dir("3d-import");
    const CliResult r = cli("--problem trisphere-3d --resolution 16,16,16 --slice 2,5 --onion 0.5 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const Dataset d = load_dataset(out);
    EXPECT_EQ(read_bytes(out / "heatmap.ppm"), encode_ppm(decision_view(d, Method::heatmap, SliceSpec{2, 5})));
    const auto onion = nlohmann::json::parse(read_bytes(out / "onion.json"));
    EXPECT_EQ(onion.at("cells").get<std::vector<CellIndex>>(), onion_shell(*d.heatmap, 0.5).cells);
    EXPECT_EQ(onion.at("count"), onion.at("cells").size());

    ASSERT_EQ(cli("--import " + (out / "heatmap.mopf").string() + " --slice 2,5 --out " + again.string()).code, 0);
    EXPECT_EQ(read_bytes(again / "heatmap.ppm"), read_bytes(out / "heatmap.ppm"));

    const fs::path plain = temp_dir("3d-default");
    ASSERT_EQ(cli("--problem trisphere-3d --resolution 16,16,16 --method heatmap --out " + plain.string()).code, 0);
    EXPECT_EQ(read_bytes(plain / "heatmap.ppm"), encode_ppm(decision_view(d, Method::heatmap, SliceSpec{3, 8})));

    EXPECT_EQ(cli("--problem trisphere-3d --resolution 16,16,16 --slice 2,16 --out " + plain.string()).code, 1);
    EXPECT_EQ(cli("--problem bisphere-2d --resolution 20,20 --onion 1 --out " + plain.string()).code, 1);
}

TEST(Cli, IoErrorsExitWithThree) {
    const fs::path dir = temp_dir("io");
    EXPECT_EQ(cli("--import " + (dir / "missing.mopf").string() + " --out " + dir.string()).code, 3);
    write_bytes(dir / "junk.mopf", "not a field file");
    EXPECT_EQ(cli("--import " + (dir / "junk.mopf").string() + " --method heatmap --out " + (dir / "o").string()).code, 3);
    write_bytes(dir / "file", "x");
    const CliResult r = cli("--problem bisphere-2d --resolution 20,20 --out " + (dir / "file" / "sub").string());
    EXPECT_EQ(r.code, 3) << r.err;
}
