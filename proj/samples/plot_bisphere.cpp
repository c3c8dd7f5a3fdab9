// Computes the PLOT of the default bi-sphere problem and writes the images to the working directory.

#include <moplot/moplot.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace moplot;
    const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 200;

    const Problem problem = instantiate(spec_for("bisphere-2d"));
    const Grid grid = make_grid(problem, {n, n});
    const Landscape landscape = evaluate_field(problem, grid);
    const HeatmapResult heat = gradient_field_heatmap(landscape.mog);
    const PlotData plot = compute_plot(landscape, heat);

    write_image(render_plot(plot), "bisphere-plot.ppm");
    write_image(render(heat.heights, ColorScale::heat), "bisphere-heatmap.ppm");

    const auto components = connected_components(grid, plot.efficient);
    std::cout << plot.efficient.size() << " efficient cells in " << components.size() << " component(s)\n";
}
