/** Server-side SVG rendering through the echarts SSR pipeline. */

import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export function renderSvg(
  option: EChartsOption,
  width = 1200,
  height = 500
): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
