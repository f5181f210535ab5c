#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qm/cli.hpp"
#include "qm/core.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Graded quotient module toolkit"};
    app.set_help_flag("-h,--help", "Show help");

    std::string sub, file, configPath, mRange;
    std::vector<std::string> tols;
    qm::RunConfig f;  // flag values, applied over the config file only when given

    app.add_option("command", sub, "space | shifts | toeplitz | quotient | balance | cd-scan | stability | szego | "
                                   "suite | validate")
        ->required()
        ->check(CLI::IsMember(qm::subcommands()));
    app.add_option("file", file, "Report file (validate)");
    app.add_option("--config", configPath, "JSON config (// comments allowed)");
    auto* oPreset = app.add_option("--preset", f.preset, "cp1, cp2, ..., segre11, veronese");
    auto* oModel = app.add_option("--model", f.model, "Model JSON file");
    auto* oM = app.add_option("--m", mRange, "Level range A..B");
    auto* oTol = app.add_option("--tol", tols, "Threshold override name=value (repeatable)");
    auto* oSamples = app.add_option("--samples", f.samples, "Quadrature samples");
    auto* oSeed = app.add_option("--seed", f.seed, "Random seed");
    auto* oOut = app.add_option("--out", f.out, "Output file (default stdout)");
    auto* oFormat = app.add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    auto* oCheck = app.add_option("--check", f.check, "shifts: all, row, orbit, q-isometry, schatten, defect");
    auto* oBundle = app.add_option("--bundle", f.bundle, "Bundle spec, e.g. line:2, tangent, sum(line:0,line:1)");
    auto* oQuot = app.add_option("--quotient", f.quotient, "Quotient definition (JSON file)");
    auto* oE = app.add_option("--e", f.e, "stability: the bundle E");
    auto* oF = app.add_option("--f", f.f, "stability: the quotient F");
    auto* oSym = app.add_option("--symbol", f.symbol, "toeplitz: symbol literal");
    auto* oGrid = app.add_option("--grid", f.grid, "cd-scan: number of points");
    auto* oPoints = app.add_option("--points", f.points, "szego: number of boundary points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    qm::RunConfig cfg;
    try {
        if (!configPath.empty()) {
            std::ifstream in(configPath, std::ios::binary);
            if (!in) throw qm::ParseError("cannot read config " + configPath);
            std::ostringstream ss;
            ss << in.rdbuf();
            cfg = qm::config_from_json(ss.str());
        }
        if (oPreset->count()) cfg.preset = f.preset;
        if (oModel->count()) cfg.model = f.model;
        if (oM->count()) std::tie(cfg.mMin, cfg.mMax) = qm::parse_m_range(mRange);
        if (oTol->count())
            for (auto& t : tols) {
                auto eq = t.find('=');
                if (eq == std::string::npos) throw qm::ParseError("--tol expects name=value, got '" + t + "'");
                try {
                    cfg.tol[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
                } catch (const std::logic_error&) {
                    throw qm::ParseError("--tol value is not a number: '" + t + "'");
                }
            }
        if (oSamples->count()) cfg.samples = f.samples;
        if (oSeed->count()) cfg.seed = f.seed;
        if (oOut->count()) cfg.out = f.out;
        if (oFormat->count()) cfg.format = f.format;
        if (oCheck->count()) cfg.check = f.check;
        if (oBundle->count()) cfg.bundle = f.bundle;
        if (oQuot->count()) cfg.quotient = f.quotient;
        if (oE->count()) cfg.e = f.e;
        if (oF->count()) cfg.f = f.f;
        if (oSym->count()) cfg.symbol = f.symbol;
        if (oGrid->count()) cfg.grid = f.grid;
        if (oPoints->count()) cfg.points = f.points;
        cfg.file = file;
    } catch (const qm::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
    return qm::run(sub, cfg, std::cout, std::cerr);
}
