package demo;

public class Money {
    public boolean showBug() {
        double a = 0.1;
        double b = 0.2;
        double sum = a + b;
        return sum == 0.3;
    }
}
