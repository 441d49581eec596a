import { runFigureCli } from "../cli.js";

process.exit(runFigureCli("time-series", process.argv.slice(2)));
