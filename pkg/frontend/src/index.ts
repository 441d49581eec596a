export * from "./csv.js";
export * from "./svg.js";
export * from "./figures.js";
export { buildFigure, render, type FigureKind, type FigureSpec } from "./render.js";
export { runFigureCli, usage } from "./cli.js";
